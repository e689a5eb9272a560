/* src/gui/render.cxx */
#include "core/error.h"
#  include "core/error.h"  /* repeated on purpose */
#include "../core/state.h"
// #include "ghost_line.h"
/*
#include "ghost_block.h"
*/
int placeholder_43;
