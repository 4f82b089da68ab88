#pragma once

#include "clique_tree.hpp"
#include "dp.hpp"
#include "graph.hpp"
#include "instance.hpp"
#include "oracle.hpp"
#include "vectors.hpp"
