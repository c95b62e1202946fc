#pragma once

#include "slhjb/error.hpp"
#include "slhjb/vec.hpp"
#include "slhjb/geometry.hpp"
#include "slhjb/mesh.hpp"
#include "slhjb/problem.hpp"
#include "slhjb/scheme.hpp"
#include "slhjb/markov.hpp"
#include "slhjb/problems.hpp"
#include "slhjb/study.hpp"
