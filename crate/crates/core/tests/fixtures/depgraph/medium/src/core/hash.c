/* src/core/hash.c */
#include "lib/compat.h"
#  include "lib/compat.h"  /* repeated on purpose */
#include "internal.h"
// #include "ghost_line.h"
/*
#include "ghost_block.h"
*/
int placeholder_17;
