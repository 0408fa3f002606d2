public class SwapSum {
    //@ ensures \result == (a + b;
    public int swapSum(int a, int b) {
        int t = a;
        a = b;
        b = t;
        return a + b;
    }
}
