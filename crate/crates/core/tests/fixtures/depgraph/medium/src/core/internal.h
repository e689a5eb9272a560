/* src/core/internal.h */
#include "util/bits.h"
#  include "util/bits.h"  /* repeated on purpose */
#include "util/str.h"
#include "util/path.h"
// #include "ghost_line.h"
/*
#include "ghost_block.h"
*/
int placeholder_20;
