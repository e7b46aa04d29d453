#pragma once

#include "domcert/error.hpp"
#include "domcert/graph.hpp"
#include "domcert/graph_io.hpp"
#include "domcert/rational.hpp"
#include "domcert/graphon.hpp"
#include "domcert/involution.hpp"
#include "domcert/percolation.hpp"
#include "domcert/screening.hpp"
#include "domcert/constructions.hpp"
#include "domcert/falsify.hpp"
#include "domcert/certify.hpp"
