fn main() {
    println!("jucys: suites not wired yet");
}
