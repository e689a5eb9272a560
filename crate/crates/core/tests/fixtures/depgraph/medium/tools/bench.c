/* tools/bench.c */
#include "util/bits.h"
#  include "util/bits.h"  /* repeated on purpose */
// #include "ghost_line.h"
/*
#include "ghost_block.h"
*/
int placeholder_52;
