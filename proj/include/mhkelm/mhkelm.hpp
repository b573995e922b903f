#pragma once

#include "mhkelm/admissibility.hpp"
#include "mhkelm/data.hpp"
#include "mhkelm/elm.hpp"
#include "mhkelm/error.hpp"
#include "mhkelm/evaluation.hpp"
#include "mhkelm/kelm.hpp"
#include "mhkelm/kernels.hpp"
#include "mhkelm/labels.hpp"
#include "mhkelm/linalg.hpp"
#include "mhkelm/model_io.hpp"
#include "mhkelm/normalize.hpp"
#include "mhkelm/random.hpp"
#include "mhkelm/registry.hpp"
#include "mhkelm/stats.hpp"
