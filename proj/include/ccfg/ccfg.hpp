#pragma once

#include "ccfg/bench.hpp"
#include "ccfg/compiled.hpp"
#include "ccfg/constraints.hpp"
#include "ccfg/document.hpp"
#include "ccfg/error.hpp"
#include "ccfg/grammar.hpp"
#include "ccfg/harness.hpp"
#include "ccfg/metrics.hpp"
#include "ccfg/random.hpp"
#include "ccfg/recognizer.hpp"
#include "ccfg/refine.hpp"
#include "ccfg/sampler.hpp"
#include "ccfg/wellformedness.hpp"
