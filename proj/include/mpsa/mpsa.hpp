#pragma once

// Stateful multiparty session assertions: local assertions, processes with a
// virtual state, their modal-logic characterisation and the checkers.

#include "mpsa/kernel/value.hpp"
#include "mpsa/kernel/expr.hpp"
#include "mpsa/kernel/ast.hpp"
#include "mpsa/kernel/print.hpp"
#include "mpsa/kernel/parse.hpp"
#include "mpsa/kernel/names.hpp"
#include "mpsa/kernel/json.hpp"
#include "mpsa/predicates.hpp"
#include "mpsa/lts.hpp"
#include "mpsa/embedding.hpp"
#include "mpsa/shuffle.hpp"
#include "mpsa/satisfaction.hpp"
#include "mpsa/typing.hpp"
#include "mpsa/automata.hpp"
#include "mpsa/pure_hml.hpp"
#include "mpsa/bundle.hpp"
