/* tools/lint.c */
#include "util/env.h"
#  include "util/env.h"  /* repeated on purpose */
#include "src/gui/theme.hpp"
#include "util/str.h"
// #include "ghost_line.h"
/*
#include "ghost_block.h"
*/
int placeholder_53;
