#pragma once

#include "aef/bundle.hpp"
#include "aef/centrality.hpp"
#include "aef/degrade.hpp"
#include "aef/episim.hpp"
#include "aef/error.hpp"
#include "aef/exf.hpp"
#include "aef/experiments.hpp"
#include "aef/graph.hpp"
#include "aef/openflights.hpp"
#include "aef/parallel.hpp"
#include "aef/random.hpp"
#include "aef/reed_frost.hpp"
#include "aef/stats.hpp"
#include "aef/synthetic.hpp"
#include "aef/version.hpp"
