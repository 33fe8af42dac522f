#include "app.hpp"

int main(int argc, char** argv) { return maxwell1d::app::run(argc, argv); }
