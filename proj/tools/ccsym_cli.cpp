#include <iostream>

#include "ccsym/rings.hpp"

int main()
{
	std::cout << "ccsym (work in progress)\n";
	return 0;
}
