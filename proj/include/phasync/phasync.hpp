#pragma once

#include "phasync/qep.hpp"
#include "phasync/synchro.hpp"
#include "phasync/compat.hpp"
#include "phasync/geometry.hpp"
#include "phasync/dynamics.hpp"
