// SPDX-License-Identifier: Apache-2.0
#ifndef CLCRN_CLCRN_HPP
#define CLCRN_CLCRN_HPP

#include "clcrn/autodiff.hpp"
#include "clcrn/data.hpp"
#include "clcrn/errors.hpp"
#include "clcrn/geometry.hpp"
#include "clcrn/graph.hpp"
#include "clcrn/kernel.hpp"
#include "clcrn/metrics.hpp"
#include "clcrn/model.hpp"
#include "clcrn/rng.hpp"

#endif
