#pragma once

#include "termnet/errors.hpp"
#include "termnet/term_model.hpp"
#include "termnet/mincut.hpp"
#include "termnet/renyi.hpp"
#include "termnet/interpretation.hpp"
#include "termnet/routing.hpp"
#include "termnet/algebra.hpp"
#include "termnet/search.hpp"
#include "termnet/multiuser.hpp"
#include "termnet/dynamic_networks.hpp"
#include "termnet/builders.hpp"
#include "termnet/io.hpp"
#include "termnet/catalog.hpp"
