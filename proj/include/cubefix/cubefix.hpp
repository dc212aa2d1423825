#pragma once

#include "cubefix/adversary.hpp"
#include "cubefix/balanced.hpp"
#include "cubefix/bench.hpp"
#include "cubefix/errors.hpp"
#include "cubefix/geometry.hpp"
#include "cubefix/instances.hpp"
#include "cubefix/oracle.hpp"
#include "cubefix/properties.hpp"
#include "cubefix/solver.hpp"
#include "cubefix/total_search.hpp"
