#pragma once

#include "sbci/config.hpp"
#include "sbci/conservation.hpp"
#include "sbci/davidson.hpp"
#include "sbci/fci/determinants.hpp"
#include "sbci/fci/fci_operator.hpp"
#include "sbci/fci/fcidump.hpp"
#include "sbci/fci/sigma.hpp"
#include "sbci/fci/spin.hpp"
#include "sbci/matrix_market.hpp"
#include "sbci/operator.hpp"
#include "sbci/ortho.hpp"
#include "sbci/precond.hpp"
#include "sbci/sbci1.hpp"
#include "sbci/sbci2.hpp"
#include "sbci/small_eig.hpp"
#include "sbci/synthetic.hpp"
#include "sbci/trace.hpp"
#include "sbci/vector_ops.hpp"
