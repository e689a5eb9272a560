/* include/util/str.h */
#include "core/hash.h"
#  include "core/hash.h"  /* repeated on purpose */
#include "version.h"
// #include "ghost_line.h"
/*
#include "ghost_block.h"
*/
int placeholder_8;
