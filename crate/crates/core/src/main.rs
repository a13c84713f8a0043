fn main() {
    hocomp::cli::main()
}
