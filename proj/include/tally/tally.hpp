#pragma once

#include "tally/accept.hpp"
#include "tally/ast.hpp"
#include "tally/census.hpp"
#include "tally/errors.hpp"
#include "tally/eval.hpp"
#include "tally/json_io.hpp"
#include "tally/kb.hpp"
#include "tally/model.hpp"
#include "tally/model_space.hpp"
#include "tally/numbers.hpp"
#include "tally/parser.hpp"
#include "tally/support.hpp"
#include "tally/theorems.hpp"
