#pragma once

#include "plap/harness/acceptance.hpp"
#include "plap/harness/config.hpp"
#include "plap/harness/emit.hpp"
#include "plap/harness/scenario.hpp"
#include "plap/harness/sweep.hpp"
