// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "dsa/channel.hpp"
#include "dsa/constants.hpp"
#include "dsa/error.hpp"
#include "dsa/geometry.hpp"
#include "dsa/impedance.hpp"
#include "dsa/lbfgs.hpp"
#include "dsa/loads.hpp"
#include "dsa/network.hpp"
#include "dsa/special_functions.hpp"
#include "dsa/synth.hpp"

#define DSA_VERSION_STRING "0.1.0"
