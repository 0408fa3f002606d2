public class SumTo {
    /*@ requires 0 <= n && n <= 1000;
      @ ensures \result == n * (n + 1) / 2;
      @*/
    public int sumTo(int n) {
        int s = 0;
        for (int i = 1; i <= n; i++) {
            s += i;
        }
        return s;
    }
}
