#pragma once

#include "stellar/atomic.hpp"
#include "stellar/error.hpp"
#include "stellar/essential.hpp"
#include "stellar/factorizer.hpp"
#include "stellar/io.hpp"
#include "stellar/linalg.hpp"
#include "stellar/poly.hpp"
#include "stellar/roots.hpp"
#include "stellar/special_cases.hpp"
#include "stellar/states.hpp"
