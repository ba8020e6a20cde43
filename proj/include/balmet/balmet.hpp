#ifndef BALMET_BALMET_HPP
#define BALMET_BALMET_HPP

// Convenience umbrella for the whole library.

#include "balmet/balance.hpp"
#include "balmet/bundle.hpp"
#include "balmet/chart.hpp"
#include "balmet/common.hpp"
#include "balmet/ddbar.hpp"
#include "balmet/expr.hpp"
#include "balmet/grassmann.hpp"
#include "balmet/jobs.hpp"
#include "balmet/maps.hpp"
#include "balmet/quadrature.hpp"
#include "balmet/rigidity.hpp"
#include "balmet/sampling.hpp"
#include "balmet/serialize.hpp"
#include "balmet/suite.hpp"

#endif
