#pragma once

#include "dakns/baker_tau.hpp"
#include "dakns/bilinear.hpp"
#include "dakns/config.hpp"
#include "dakns/dynamics.hpp"
#include "dakns/export.hpp"
#include "dakns/hierarchy.hpp"
#include "dakns/json_io.hpp"
#include "dakns/lattice.hpp"
#include "dakns/matrix.hpp"
#include "dakns/random.hpp"
#include "dakns/report.hpp"
#include "dakns/resolvent.hpp"
#include "dakns/scalar.hpp"
#include "dakns/series.hpp"
#include "dakns/verify.hpp"
