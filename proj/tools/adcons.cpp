#include <adcons/cli.hpp>

int main(int argc, char** argv)
{
    return adcons::cli::run(argc, argv);
}
