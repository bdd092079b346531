#include "towerlab/heuristics.hpp"
