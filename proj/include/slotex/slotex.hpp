#pragma once

#include "core.hpp"
#include "random.hpp"
#include "demand.hpp"
#include "metrics.hpp"
#include "exchange.hpp"
#include "learning.hpp"
#include "runner.hpp"
#include "config.hpp"
#include "artifacts.hpp"
