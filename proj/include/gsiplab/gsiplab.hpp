// Copyright (c) gsiplab contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "gsiplab/algorithms.hpp"
#include "gsiplab/box.hpp"
#include "gsiplab/error.hpp"
#include "gsiplab/expr.hpp"
#include "gsiplab/global_opt.hpp"
#include "gsiplab/gsip.hpp"
#include "gsiplab/interval.hpp"
#include "gsiplab/oracle_check.hpp"
#include "gsiplab/problem_format.hpp"
#include "gsiplab/tape.hpp"
