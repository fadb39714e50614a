#ifndef CSPSHIFT_CSPSHIFT_HPP
#define CSPSHIFT_CSPSHIFT_HPP

#include "events.hpp"
#include "observations.hpp"
#include "parser.hpp"
#include "printer.hpp"
#include "process.hpp"
#include "rational.hpp"
#include "refine.hpp"
#include "report.hpp"
#include "semantics.hpp"
#include "shifting.hpp"
#include "timed.hpp"

#endif
