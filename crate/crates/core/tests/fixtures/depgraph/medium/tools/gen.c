/* tools/gen.c */
#include "core/error.h"
#  include "core/error.h"  /* repeated on purpose */
#include "core/config_defs.h"
#include "src/core/state.h"
// #include "ghost_line.h"
/*
#include "ghost_block.h"
*/
int placeholder_50;
