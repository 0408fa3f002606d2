public class CountPairs {
    //@ requires 0 <= n && n <= 1000;
    //@ ensures \result == n * (n - 1) / 2;
    public int countPairs(int n) {
        int c = 0;
        for (int i = 0; i < n; i++) {
            for (int j = i + 1; j < n; j++) {
                c++;
            }
        }
        return c;
    }
}
