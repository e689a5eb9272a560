/* src/gui/widget.hh */
#include "version.h"
#  include "version.h"  /* repeated on purpose */
#include "lib/getopt.h"
#include "theme.hpp"
// #include "ghost_line.h"
/*
#include "ghost_block.h"
*/
int placeholder_37;
