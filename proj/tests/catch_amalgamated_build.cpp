// Compiles the amalgamated Catch2 implementation once for the test suite.
#include <catch2/catch_amalgamated.cpp>
