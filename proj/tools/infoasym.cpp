#include "infoasym/cli.hpp"

int main(int argc, char** argv) { return infoasym::dispatch(argc, argv); }
