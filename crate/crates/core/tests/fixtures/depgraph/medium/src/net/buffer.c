/* src/net/buffer.c */
#include "util/time.h"
#  include "util/time.h"  /* repeated on purpose */
// #include "ghost_line.h"
/*
#include "ghost_block.h"
*/
int placeholder_31;
