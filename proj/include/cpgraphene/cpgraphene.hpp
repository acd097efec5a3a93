#pragma once

#include "cpgraphene/conductivity.hpp"
#include "cpgraphene/constants.hpp"
#include "cpgraphene/energy.hpp"
#include "cpgraphene/errors.hpp"
#include "cpgraphene/polarizability.hpp"
#include "cpgraphene/quadrature.hpp"
#include "cpgraphene/reflection.hpp"
#include "cpgraphene/scan.hpp"
