/* src/net/socket.c */
#include <sys/socket.h>
#include <stdio.h>
#include "core/types.h"
#  include "core/types.h"  /* repeated on purpose */
#include "util/time.h"
#include "lib/compat.h"
#include "../gui/widget.hh"
// #include "ghost_line.h"
/*
#include "ghost_block.h"
*/
int placeholder_24;
