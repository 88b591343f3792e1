#pragma once

#include "dlogic/cantor.hpp"
#include "dlogic/decide.hpp"
#include "dlogic/enumerate.hpp"
#include "dlogic/filtration.hpp"
#include "dlogic/formula.hpp"
#include "dlogic/kripke.hpp"
#include "dlogic/parser.hpp"
#include "dlogic/relation.hpp"
#include "dlogic/topology.hpp"
