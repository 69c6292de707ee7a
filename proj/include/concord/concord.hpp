#pragma once

#include "concord/agreement.hpp"
#include "concord/attribution.hpp"
#include "concord/config.hpp"
#include "concord/dataset.hpp"
#include "concord/dtd.hpp"
#include "concord/error.hpp"
#include "concord/explain.hpp"
#include "concord/fixtures.hpp"
#include "concord/linalg.hpp"
#include "concord/linear.hpp"
#include "concord/model.hpp"
#include "concord/neural.hpp"
#include "concord/pipeline.hpp"
#include "concord/rng.hpp"
#include "concord/shapley.hpp"
#include "concord/svg.hpp"
#include "concord/trees.hpp"
