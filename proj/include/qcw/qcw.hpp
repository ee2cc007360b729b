#pragma once

#include "amalgam.hpp"
#include "base_group.hpp"
#include "config.hpp"
#include "contexts.hpp"
#include "error.hpp"
#include "experiments.hpp"
#include "metric.hpp"
#include "rational.hpp"
#include "run.hpp"
#include "torus.hpp"
#include "words.hpp"
