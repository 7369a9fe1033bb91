// Umbrella header.
#pragma once

#include "islkit/formula.hpp"
#include "islkit/syntax.hpp"
#include "islkit/kripke.hpp"
#include "islkit/decide.hpp"
#include "islkit/translate.hpp"
#include "islkit/closed.hpp"
#include "islkit/fixpoint.hpp"
#include "islkit/bisim.hpp"
#include "islkit/random.hpp"
#include "islkit/interp.hpp"
