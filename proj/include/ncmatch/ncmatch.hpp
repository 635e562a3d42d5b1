#pragma once

#include "ncmatch/duals.hpp"
#include "ncmatch/errors.hpp"
#include "ncmatch/field.hpp"
#include "ncmatch/graph.hpp"
#include "ncmatch/io.hpp"
#include "ncmatch/laminar.hpp"
#include "ncmatch/matcher.hpp"
#include "ncmatch/oracle.hpp"
#include "ncmatch/parallel.hpp"
#include "ncmatch/partial.hpp"
#include "ncmatch/reduce.hpp"
#include "ncmatch/structure.hpp"
#include "ncmatch/walks.hpp"
#include "ncmatch/weights.hpp"
