/* lib/getopt.h */
#include "core/types.h"
#  include "core/types.h"  /* repeated on purpose */
#include "util/bits.h"
#include "src/gui/widget.hh"
// #include "ghost_line.h"
/*
#include "ghost_block.h"
*/
int placeholder_49;
