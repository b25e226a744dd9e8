#pragma once

#include "predtrans/ast.hpp"
#include "predtrans/checker.hpp"
#include "predtrans/error.hpp"
#include "predtrans/evaluate.hpp"
#include "predtrans/formula.hpp"
#include "predtrans/generator.hpp"
#include "predtrans/oracle.hpp"
#include "predtrans/parser.hpp"
#include "predtrans/precondition.hpp"
#include "predtrans/report.hpp"
#include "predtrans/smtlib.hpp"
#include "predtrans/state_space.hpp"
#include "predtrans/transformers.hpp"
#include "predtrans/transition.hpp"
