#pragma once

#include "plap/eigen/minimize.hpp"
#include "plap/eigen/model_space.hpp"
#include "plap/eigen/problem.hpp"
#include "plap/eigen/shooting.hpp"
