public class AbsValue {
    //@ requires x > -2147483648;
    //@ ensures \result == (x < 0 ? -x : x);
    public int absValue(int x) {
        if (x < 0) {
            return -x;
        }
        return x;
    }
}
