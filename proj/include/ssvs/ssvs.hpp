#pragma once
//! Umbrella header.

#include "ssvs/analysis.hpp"
#include "ssvs/config.hpp"
#include "ssvs/counting.hpp"
#include "ssvs/data.hpp"
#include "ssvs/error.hpp"
#include "ssvs/linalg.hpp"
#include "ssvs/oracle.hpp"
#include "ssvs/pattern.hpp"
#include "ssvs/prior.hpp"
#include "ssvs/sampler.hpp"
#include "ssvs/summary.hpp"
#include "ssvs/svg.hpp"
#include "ssvs/term.hpp"
