/* src/core/error.c */
#include "../gui/font.h"
#  include "../gui/font.h"  /* repeated on purpose */
// #include "ghost_line.h"
/*
#include "ghost_block.h"
*/
int placeholder_19;
