#pragma once

// Umbrella header for the DEDC toolkit.

#include "dedc/checker.hpp"
#include "dedc/config.hpp"
#include "dedc/error_classifier.hpp"
#include "dedc/formal_core.hpp"
#include "dedc/gateway.hpp"
#include "dedc/hash.hpp"
#include "dedc/io.hpp"
#include "dedc/metrics.hpp"
#include "dedc/pipeline.hpp"
#include "dedc/rng.hpp"
#include "dedc/sample_gen.hpp"
#include "dedc/scheme_enum.hpp"
#include "dedc/task_builder.hpp"
