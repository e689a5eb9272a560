/* include/core/alloc.h */
#include "util/math.h"
#  include "util/math.h"  /* repeated on purpose */
// #include "ghost_line.h"
/*
#include "ghost_block.h"
*/
int placeholder_1;
