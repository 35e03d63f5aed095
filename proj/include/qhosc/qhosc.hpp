#pragma once
/// @file qhosc.hpp
/// @brief Umbrella header.

#include "qhosc/numeric.hpp"
#include "qhosc/context.hpp"
#include "qhosc/qkernel.hpp"
#include "qhosc/polynomial.hpp"
#include "qhosc/qhermite.hpp"
#include "qhosc/qoscillator.hpp"
#include "qhosc/qcalculus.hpp"
#include "qhosc/qmeasure.hpp"
#include "qhosc/coherent.hpp"
#include "qhosc/extremal.hpp"
#include "qhosc/verify.hpp"
