/* src/core/main.c */
#include <stdio.h>
#include <stdlib.h>
#include <config.h>
#include "core/config_defs.h"
#  include "core/config_defs.h"  /* repeated on purpose */
// #include "ghost_line.h"
/*
#include "ghost_block.h"
*/
int placeholder_14;
