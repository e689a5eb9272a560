/* src/core/state.c */
#include "util/env.h"
#  include "util/env.h"  /* repeated on purpose */
#include "../gui/window.hh"
// #include "ghost_line.h"
/*
#include "ghost_block.h"
*/
int placeholder_22;
